//! Linearized fluctuation dynamics: the 8×8 drift and diffusion matrices in
//! the fixed quadrature ordering, and the 4×4 collective-mode model for
//! identical cavities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::params::{DetuningSign, PhysicalParams};
use crate::scalar::Scalar;
use crate::squeezing::SqueezedBath;
use crate::steady::SteadyState;

/// Quadrature ordering `(q₁, p₁, X₁, Y₁, q₂, p₂, X₂, Y₂)`.
pub mod order {
    pub const Q1: usize = 0;
    pub const P1: usize = 1;
    pub const X1: usize = 2;
    pub const Y1: usize = 3;
    pub const Q2: usize = 4;
    pub const P2: usize = 5;
    pub const X2: usize = 6;
    pub const Y2: usize = 7;

    pub const LABELS: [&str; 8] = ["q1", "p1", "X1", "Y1", "q2", "p2", "X2", "Y2"];
}

/// Per-cavity rates entering the drift matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityRates<T> {
    pub mech_freq: T,
    pub mech_damping: T,
    pub decay: T,
    /// Entry `A[X, Y]` of the optical block (minus `A[Y, X]`).
    pub rotation: T,
    pub coupling: T,
}

/// Drift matrix from raw rates.
///
/// Per cavity: `q̇ = ω p`, `ṗ = −ω q − γ p + G X`, `Ẋ = −κ X + r Y`,
/// `Ẏ = −r X − κ Y + G q`; hopping adds `Ẋ₁ −= ξ Y₂`, `Ẏ₁ += ξ X₂` and the
/// mirror image for cavity 2.
pub fn drift_matrix<T: Scalar>(cav: &[CavityRates<T>; 2], xi: T) -> Matrix<T> {
    use order::*;
    let mut a = Matrix::zeros(8, 8);
    for (j, c) in cav.iter().enumerate() {
        let o = 4 * j;
        a[(o, o + 1)] = c.mech_freq;
        a[(o + 1, o)] = -c.mech_freq;
        a[(o + 1, o + 1)] = -c.mech_damping;
        a[(o + 1, o + 2)] = c.coupling;
        a[(o + 2, o + 2)] = -c.decay;
        a[(o + 2, o + 3)] = c.rotation;
        a[(o + 3, o + 2)] = -c.rotation;
        a[(o + 3, o + 3)] = -c.decay;
        a[(o + 3, o)] = c.coupling;
    }
    a[(X1, Y2)] = -xi;
    a[(Y1, X2)] = xi;
    a[(X2, Y1)] = -xi;
    a[(Y2, X1)] = xi;
    a
}

/// Optical-block rotation for a detuning `Δ_j` under a sign convention:
/// `Direct` writes `Ẋ = −κX + ΔY`, `Inverted` writes `Ẋ = −κX − ΔY`.
pub fn optical_rotation(sign: DetuningSign, delta: f64) -> f64 {
    match sign {
        DetuningSign::Direct => delta,
        DetuningSign::Inverted => -delta,
    }
}

pub fn build_drift(ss: &SteadyState, params: &PhysicalParams) -> Matrix<f64> {
    let cav = [0, 1].map(|j| CavityRates {
        mech_freq: params.mech_freq[j],
        mech_damping: params.mech_damping[j],
        decay: params.cavity_decay[j],
        rotation: optical_rotation(params.detuning_sign, ss.eff_detuning[j]),
        coupling: ss.eff_coupling[j],
    });
    drift_matrix(&cav, params.hop_strength)
}

/// Diffusion matrix from rates, phonon occupations and the squeezed bath.
pub fn diffusion_matrix<T: Scalar>(
    mech_damping: [T; 2],
    decay: [T; 2],
    thermal_occ: [T; 2],
    bath: &SqueezedBath<T>,
) -> Matrix<T> {
    use order::*;
    let one = T::one();
    let two = T::lit(2.0);
    let n = bath.photon_number;
    let m = bath.correlation;
    let mut q = Matrix::zeros(8, 8);
    for j in 0..2 {
        let o = 4 * j;
        q[(o + 1, o + 1)] = mech_damping[j] * (two * thermal_occ[j] + one);
        q[(o + 2, o + 2)] = decay[j] * (two * n + one);
        q[(o + 3, o + 3)] = decay[j] * (two * n + one);
    }
    let k = (decay[0] * decay[1]).sqrt();
    q[(X1, X2)] = two * k * m;
    q[(X2, X1)] = two * k * m;
    q[(Y1, Y2)] = -two * k * m;
    q[(Y2, Y1)] = -two * k * m;
    q
}

pub fn build_diffusion(params: &PhysicalParams, bath: &SqueezedBath<f64>) -> Result<Matrix<f64>> {
    bath.validate()?;
    let d = params.derived();
    Ok(diffusion_matrix(
        params.mech_damping,
        params.cavity_decay,
        d.thermal_occ,
        bath,
    ))
}

/// Collective-mode model for identical cavities in the sum coordinates
/// `Q = q₁ + q₂`, `P = p₁ + p₂`, `X = X₁ + X₂`, `Y = Y₁ + Y₂`:
/// `Ẋ = −κX − Δ'Y`, `Ẏ = Δ'X − κY + GQ` with `Δ' = ξ − Δ` for a user-axis
/// detuning `Δ` (red detuning at `Δ > 0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedModel {
    pub drift: Matrix<f64>,
    pub delta_prime: f64,
    pub mech_freq: f64,
    pub mech_damping: f64,
    pub decay: f64,
    pub coupling: f64,
}

/// Reduced model for effective coupling `G` and user-axis detuning `delta`.
pub fn build_reduced(params: &PhysicalParams, coupling: f64, delta: f64) -> Result<ReducedModel> {
    if !params.is_symmetric() {
        return Err(Error::AsymmetricCavities(
            "all per-cavity parameters must coincide".into(),
        ));
    }
    let (w, g, k) = (params.mech_freq[0], params.mech_damping[0], params.cavity_decay[0]);
    let dp = params.hop_strength - delta;
    let drift = Matrix::from_rows(&[
        [0.0, w, 0.0, 0.0],
        [-w, -g, coupling, 0.0],
        [0.0, 0.0, -k, -dp],
        [coupling, 0.0, dp, -k],
    ]);
    Ok(ReducedModel {
        drift,
        delta_prime: dp,
        mech_freq: w,
        mech_damping: g,
        decay: k,
        coupling,
    })
}

impl ReducedModel {
    /// Detuning in the red-positive convention, `−Δ'`.
    pub fn red_detuning(&self) -> f64 {
        -self.delta_prime
    }

    /// Diffusion of the unnormalized sum coordinates:
    /// `diag(0, 2γ(2n̄+1), 2κ(2N+1+2M), 2κ(2N+1−2M))`.
    pub fn diffusion(&self, bath: &SqueezedBath<f64>, thermal_occ: f64) -> Matrix<f64> {
        let (n, m) = (bath.photon_number, bath.correlation);
        let (g, k) = (self.mech_damping, self.decay);
        Matrix::from_diagonal(&[
            0.0,
            2.0 * g * (2.0 * thermal_occ + 1.0),
            2.0 * k * (2.0 * n + 1.0 + 2.0 * m),
            2.0 * k * (2.0 * n + 1.0 - 2.0 * m),
        ])
    }

    /// Diffusion of the `1/√2`-normalized collective coordinates, whose
    /// covariance has vacuum variance ½.
    pub fn normalized_diffusion(&self, bath: &SqueezedBath<f64>, thermal_occ: f64) -> Matrix<f64> {
        self.diffusion(bath, thermal_occ).scale(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::solve_fixed_detuning;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn rates(w: f64, g: f64, k: f64, r: f64, c: f64) -> CavityRates<f64> {
        CavityRates {
            mech_freq: w,
            mech_damping: g,
            decay: k,
            rotation: r,
            coupling: c,
        }
    }

    /// Characteristic polynomial by Faddeev–LeVerrier, leading coefficient first.
    fn char_poly(a: &Matrix<f64>) -> Vec<f64> {
        let n = a.nrows();
        let mut c = vec![1.0];
        let mut m = Matrix::zeros(n, n);
        for k in 1..=n {
            m = &(a * &m) + &Matrix::identity(n).scale(c[k - 1]);
            let am = a * &m;
            c.push(-am.trace() / k as f64);
        }
        c
    }

    #[test]
    fn decoupled_blocks() {
        let cav = [rates(2.0, 0.1, 0.7, 1.3, 0.0), rates(2.0, 0.1, 0.7, 1.3, 0.0)];
        let a = drift_matrix(&cav, 0.0);
        let want = Matrix::from_rows(&[[0.0, 2.0], [-2.0, -0.1]]);
        assert_eq!(a.block(0, 0, 2, 2), want);
        assert_eq!(a.block(4, 4, 2, 2), want);
        let opt = Matrix::from_rows(&[[-0.7, 1.3], [-1.3, -0.7]]);
        assert_eq!(a.block(2, 2, 2, 2), opt);
        assert_eq!(a.block(6, 6, 2, 2), opt);
        assert_eq!(a.count_nonzero(), 14);
    }

    #[test]
    fn hopping_placement_and_sparsity() {
        let cav = [rates(1.1, 0.2, 0.9, 0.4, 0.3), rates(1.2, 0.3, 0.8, 0.5, 0.6)];
        let a = drift_matrix(&cav, 0.37);
        assert_eq!(a[(2, 7)], -0.37);
        assert_eq!(a[(3, 6)], 0.37);
        assert_eq!(a[(6, 3)], -0.37);
        assert_eq!(a[(7, 2)], 0.37);
        assert_eq!(a.count_nonzero(), 22);
    }

    #[test]
    fn unit_parameters_characteristic_polynomial() {
        let cav = [rates(1.0, 1.0, 1.0, 1.0, 1.0); 2];
        let a = drift_matrix(&cav, 1.0);
        let want = [1.0, 6.0, 21.0, 46.0, 66.0, 64.0, 41.0, 16.0, 3.0];
        let got = char_poly(&a);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-10, "{got:?}");
        }
        // the product of the eigenvalues is the constant term
        let prod = a
            .eigenvalues()
            .unwrap()
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, z| acc * z);
        assert!((prod.re - 3.0).abs() < 1e-9 && prod.im.abs() < 1e-9);
    }

    #[test]
    fn sign_conventions_are_related_by_negation() {
        let mut p = PhysicalParams::reference();
        p.hop_strength = 0.4 * p.omega_m();
        let delta = 0.9 * p.omega_m();
        let ss_pos = solve_fixed_detuning(&p, delta, delta).unwrap();
        let mut ss_neg = ss_pos.clone();
        ss_neg.eff_detuning = [-delta; 2];
        let direct = build_drift(&ss_pos, &p);
        let mut q = p.clone();
        q.detuning_sign = DetuningSign::Inverted;
        let inverted = build_drift(&ss_neg, &q);
        assert_eq!(direct, inverted);
    }

    #[test]
    fn vacuum_diffusion() {
        let p = PhysicalParams::reference();
        let mut p0 = p.clone();
        p0.thermal = crate::params::Thermal::Occupation(0.0);
        let q = build_diffusion(&p0, &SqueezedBath::vacuum()).unwrap();
        let (g, k) = (p.mech_damping[0], p.cavity_decay[0]);
        assert_eq!(q, Matrix::from_diagonal(&[0.0, g, k, k, 0.0, g, k, k]));
    }

    #[test]
    fn squeezed_cross_terms_and_psd() {
        let mut p = PhysicalParams::reference();
        p.cavity_decay = [3.0e7, 1.2e8];
        let bath = SqueezedBath::ideal(0.05);
        let q = build_diffusion(&p, &bath).unwrap();
        let k = (3.0e7f64 * 1.2e8).sqrt();
        assert!((q[(2, 6)] - 2.0 * k * bath.correlation).abs() < 1e-6);
        assert!((q[(3, 7)] + 2.0 * k * bath.correlation).abs() < 1e-6);
        assert_eq!(q.asymmetry(), 0.0);
        for r in [0, 4] {
            for c in 0..8 {
                assert_eq!(q[(r, c)], 0.0);
            }
        }
        p.cavity_decay = [9e7; 2];
        let q = build_diffusion(&p, &bath).unwrap();
        let lo = q.symmetric_eigenvalues()[0];
        assert!(lo >= -1e-12 * q.frobenius_norm());
        assert!(build_diffusion(&p, &SqueezedBath { photon_number: 0.05, correlation: 0.3 }).is_err());
    }

    #[test]
    fn reduced_limits() {
        let p = PhysicalParams::reference();
        let w = p.omega_m();
        let r = build_reduced(&p, 0.0, 0.8 * w).unwrap();
        assert_eq!(r.drift.block(0, 2, 2, 2), Matrix::zeros(2, 2));
        assert_eq!(r.drift.block(2, 0, 2, 2), Matrix::zeros(2, 2));
        // ξ = 0: optical block equals the single-cavity block at Δ
        let r = build_reduced(&p, 0.3 * w, 0.8 * w).unwrap();
        let k = p.cavity_decay[0];
        assert_eq!(
            r.drift.block(2, 2, 2, 2),
            Matrix::from_rows(&[[-k, 0.8 * w], [-0.8 * w, -k]])
        );
        let mut asym = p.clone();
        asym.mirror_mass = [5e-12, 6e-12];
        assert!(matches!(
            build_reduced(&asym, 0.0, w),
            Err(Error::AsymmetricCavities(_))
        ));
    }

    #[test]
    fn reduced_spectrum_is_part_of_full_spectrum() {
        let mut p = PhysicalParams::reference();
        let w = p.omega_m();
        p.hop_strength = 0.6 * w;
        let delta = 1.7 * w;
        let ss = solve_fixed_detuning(&p, delta, delta).unwrap();
        let full = build_drift(&ss, &p).eigenvalues().unwrap();
        let red = build_reduced(&p, ss.eff_coupling[0], delta).unwrap();
        for z in red.drift.eigenvalues().unwrap() {
            let d = full.iter().map(|f| (f - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-8 * w, "{z} not in full spectrum");
        }
    }

    proptest! {
        #[test]
        fn drift_sparsity_is_generic(vals in proptest::array::uniform11(0.1f64..5.0)) {
            let cav = [
                rates(vals[0], vals[1], vals[2], vals[3], vals[4]),
                rates(vals[5], vals[6], vals[7], vals[8], vals[9]),
            ];
            prop_assert_eq!(drift_matrix(&cav, vals[10]).count_nonzero(), 22);
        }

        #[test]
        fn diffusion_psd_within_bound(n in 0.0f64..5.0, frac in 0.0f64..1.0, nth in 0.0f64..2000.0, k1 in 1e6f64..1e9) {
            let bath = SqueezedBath { photon_number: n, correlation: frac * (n * (n + 1.0)).sqrt() };
            let q = diffusion_matrix([600.0, 600.0], [k1, k1], [nth, nth], &bath);
            prop_assert!(q.symmetric_eigenvalues()[0] >= -1e-12 * q.frobenius_norm());
            prop_assert_eq!(q.asymmetry(), 0.0);
        }
    }
}
