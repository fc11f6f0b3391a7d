//! Squeezed-light input: degenerate parametric oscillator (DPO) spectra and
//! the white-noise bath parameters `(N, M)` with their classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative tolerance for calling a bath ideal (`M = sqrt(N(N+1))`).
pub const IDEAL_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpoParams<T> {
    /// DPO damping, rad/s.
    pub kappa_dpo: T,
    /// Amplification `ε`, rad/s.
    pub amplification: T,
    /// Center frequency `ω_s`, rad/s.
    pub center_freq: T,
}

impl<T: Scalar> DpoParams<T> {
    /// `μ = κ_dpo/2 − ε`.
    pub fn mu(&self) -> T {
        T::lit(0.5) * self.kappa_dpo - self.amplification
    }

    /// Bandwidth parameter `κ_dpo/2 + ε`.
    pub fn lambda_bw(&self) -> T {
        T::lit(0.5) * self.kappa_dpo + self.amplification
    }

    pub fn validate(&self) -> Result<()> {
        let half = T::lit(0.5) * self.kappa_dpo;
        if !(self.kappa_dpo > T::zero())
            || self.amplification < T::zero()
            || !(self.amplification < half)
        {
            return Err(Error::DpoOutOfRange {
                amplification: self.amplification.as_f64(),
                half_decay: half.as_f64(),
            });
        }
        Ok(())
    }
}

/// Output photon number `N(ω)` and two-photon correlation `M(ω)` of the DPO.
pub fn dpo_spectra<T: Scalar>(dpo: &DpoParams<T>, omega: T) -> Result<(T, T)> {
    dpo.validate()?;
    let mu = dpo.mu();
    let lam = dpo.lambda_bw();
    let d2 = (omega - dpo.center_freq).powi(2);
    let pre = (lam * lam - mu * mu) / T::lit(4.0);
    let a = T::one() / (d2 + mu * mu);
    let b = T::one() / (d2 + lam * lam);
    // a − b = 4·pre·a·b, written without the cancellation
    Ok((T::lit(4.0) * pre * pre * a * b, pre * (a + b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedBath<T> {
    /// Mean photon number `N`.
    pub photon_number: T,
    /// Two-mode correlation `M` (real, nonnegative).
    pub correlation: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathClass {
    Vacuum,
    Classical,
    Quantum,
    Ideal,
}

impl<T: Scalar> SqueezedBath<T> {
    pub fn vacuum() -> Self {
        Self {
            photon_number: T::zero(),
            correlation: T::zero(),
        }
    }

    /// Maximally correlated bath for the given `N`.
    pub fn ideal(n: T) -> Self {
        Self {
            photon_number: n,
            correlation: ideal_correlation(n),
        }
    }

    pub fn from_dpo(dpo: &DpoParams<T>) -> Result<Self> {
        let (n, m) = dpo_spectra(dpo, dpo.center_freq)?;
        Ok(Self {
            photon_number: n,
            correlation: m,
        })
    }

    /// Checks `N ≥ 0`, `M ≥ 0` and the quantum bound (with the ideal tolerance).
    pub fn validate(&self) -> Result<()> {
        self.classify().map(|_| ())
    }

    pub fn classify(&self) -> Result<BathClass> {
        classify_bath(self)
    }
}

/// `sqrt(N(N+1))`.
pub fn ideal_correlation<T: Scalar>(n: T) -> T {
    (n * (n + T::one())).sqrt()
}

pub fn classify_bath<T: Scalar>(bath: &SqueezedBath<T>) -> Result<BathClass> {
    let n = bath.photon_number;
    let m = bath.correlation;
    if !(n >= T::zero()) || !(m >= T::zero()) || !n.is_finite() || !m.is_finite() {
        return Err(Error::param(
            "bath",
            format!("N and M must be finite and >= 0, got N = {n}, M = {m}"),
        ));
    }
    let bound = ideal_correlation(n);
    let tol = T::lit(IDEAL_REL_TOL).max(T::epsilon() * T::lit(4.0)) * bound;
    if m > bound + tol {
        return Err(Error::UnphysicalBath {
            n: n.as_f64(),
            m: m.as_f64(),
            bound: bound.as_f64(),
        });
    }
    if n.is_zero() && m.is_zero() {
        return Ok(BathClass::Vacuum);
    }
    if n > T::zero() && (m - bound).abs() <= tol {
        return Ok(BathClass::Ideal);
    }
    if m < n {
        Ok(BathClass::Classical)
    } else {
        Ok(BathClass::Quantum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dpo_center_values() {
        let dpo = DpoParams {
            kappa_dpo: 1.0f64,
            amplification: 0.25,
            center_freq: 3.0,
        };
        let (n, m) = dpo_spectra(&dpo, 3.0).unwrap();
        assert!((n - 16.0 / 9.0).abs() < 1e-14);
        assert!((m - 20.0 / 9.0).abs() < 1e-14);
        assert!((m - ideal_correlation(n)).abs() < 1e-14);
    }

    #[test]
    fn dpo_without_pump_is_vacuum() {
        let dpo = DpoParams {
            kappa_dpo: 2.0,
            amplification: 0.0,
            center_freq: 0.0,
        };
        for w in [-3.0, 0.0, 0.7, 10.0] {
            assert_eq!(dpo_spectra(&dpo, w).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn dpo_rejects_threshold() {
        let dpo = DpoParams {
            kappa_dpo: 1.0,
            amplification: 0.5,
            center_freq: 0.0,
        };
        assert!(matches!(
            dpo_spectra(&dpo, 0.0),
            Err(Error::DpoOutOfRange { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let b = |n: f64, m: f64| SqueezedBath {
            photon_number: n,
            correlation: m,
        };
        assert_eq!(classify_bath(&b(0.0, 0.0)).unwrap(), BathClass::Vacuum);
        assert_eq!(
            classify_bath(&b(0.05, 0.229_128_784_747_792)).unwrap(),
            BathClass::Ideal
        );
        assert_eq!(classify_bath(&b(0.1, 0.05)).unwrap(), BathClass::Classical);
        assert_eq!(classify_bath(&b(0.1, 0.0)).unwrap(), BathClass::Classical);
        // boundary M = N counts as quantum
        assert_eq!(classify_bath(&b(0.1, 0.1)).unwrap(), BathClass::Quantum);
        assert_eq!(classify_bath(&b(0.1, 0.2)).unwrap(), BathClass::Quantum);
        assert!(matches!(
            classify_bath(&b(0.05, 0.3)),
            Err(Error::UnphysicalBath { .. })
        ));
        assert!(classify_bath(&b(-0.1, 0.0)).is_err());
    }

    #[test]
    fn ideal_correlation_values() {
        assert_eq!(ideal_correlation(0.0), 0.0);
        assert!((ideal_correlation(0.05f64) - 0.229_128_784_747_792).abs() < 1e-15);
        assert!((ideal_correlation(3.0f64) - 12f64.sqrt()).abs() < 1e-15);
        assert!((ideal_correlation(3.0f32) - 3.464_101_6).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn dpo_output_saturates_bound(k in 0.1f64..10.0, frac in 0.0f64..0.99, w0 in -5.0f64..5.0, dw in -20.0f64..20.0) {
            // M² = N(N+1) holds identically in ω, not only at the center
            let dpo = DpoParams { kappa_dpo: k, amplification: frac * k / 2.0, center_freq: w0 };
            let (n, m) = dpo_spectra(&dpo, w0 + dw).unwrap();
            prop_assert!(n >= 0.0);
            prop_assert!(m >= n);
            let scale = n * (n + 1.0);
            prop_assert!((m * m - scale).abs() <= 1e-10 * scale.max(1e-300));
            let bath = SqueezedBath { photon_number: n, correlation: m };
            prop_assert!(classify_bath(&bath).is_ok());
            let (nm, mm) = dpo_spectra(&dpo, w0 - dw).unwrap();
            prop_assert!((n - nm).abs() <= 1e-9 * n.max(1e-300));
            prop_assert!((m - mm).abs() <= 1e-9 * m.max(1e-300));
        }
    }
}
