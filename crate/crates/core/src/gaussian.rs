//! Two-mode reductions of the covariance matrix, symplectic spectra,
//! logarithmic negativity and coherent-state teleportation fidelity.
//!
//! Quadratures are normalized so that the vacuum variance is ½.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::order;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Bipartitions of the two-cavity system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BipartitePair {
    F1M1,
    F2M2,
    M1M2,
    F1F2,
}

impl BipartitePair {
    pub const ALL: [BipartitePair; 4] = [Self::F1M1, Self::F2M2, Self::M1M2, Self::F1F2];

    /// Rows of the full covariance matrix forming the pair, first mode first.
    pub fn indices(self) -> [usize; 4] {
        use order::*;
        match self {
            Self::F1M1 => [Q1, P1, X1, Y1],
            Self::F2M2 => [Q2, P2, X2, Y2],
            Self::M1M2 => [Q1, P1, Q2, P2],
            Self::F1F2 => [X1, Y1, X2, Y2],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::F1M1 => "F1M1",
            Self::F2M2 => "F2M2",
            Self::M1M2 => "M1M2",
            Self::F1F2 => "F1F2",
        }
    }
}

impl fmt::Display for BipartitePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BipartitePair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown pair `{s}` (F1M1, F2M2, M1M2, F1F2)")))
    }
}

/// 2×2 block stored row-major.
pub type Block2<T> = [[T; 2]; 2];

fn det2<T: Scalar>(b: &Block2<T>) -> T {
    b[0][0] * b[1][1] - b[0][1] * b[1][0]
}

/// A 4×4 two-mode covariance matrix `[[W₁, W_c], [W_cᵀ, W₂]]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCovariance<T: Scalar> {
    w: Matrix<T>,
}

impl<T: Scalar> PairCovariance<T> {
    pub fn new(w: Matrix<T>) -> Result<Self> {
        if w.nrows() != 4 || w.ncols() != 4 {
            return Err(Error::Dimension(format!(
                "pair covariance must be 4x4, got {}x{}",
                w.nrows(),
                w.ncols()
            )));
        }
        Ok(Self { w })
    }

    pub fn from_blocks(w1: Block2<T>, w2: Block2<T>, wc: Block2<T>) -> Self {
        let w = Matrix::from_fn(4, 4, |i, j| match (i < 2, j < 2) {
            (true, true) => w1[i][j],
            (false, false) => w2[i - 2][j - 2],
            (true, false) => wc[i][j - 2],
            (false, true) => wc[j][i - 2],
        });
        Self { w }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.w
    }

    fn block(&self, r: usize, c: usize) -> Block2<T> {
        [
            [self.w[(r, c)], self.w[(r, c + 1)]],
            [self.w[(r + 1, c)], self.w[(r + 1, c + 1)]],
        ]
    }

    pub fn w1(&self) -> Block2<T> {
        self.block(0, 0)
    }

    pub fn w2(&self) -> Block2<T> {
        self.block(2, 2)
    }

    pub fn wc(&self) -> Block2<T> {
        self.block(0, 2)
    }

    /// `det W₁ + det W₂ − 2 det W_c`.
    pub fn chi(&self) -> T {
        det2(&self.w1()) + det2(&self.w2()) - T::lit(2.0) * det2(&self.wc())
    }

    /// Partial transpose: flips the sign of the second mode's momentum.
    pub fn partial_transpose(&self) -> Self {
        let mut w = self.w.clone();
        for k in 0..4 {
            if k != 3 {
                w[(3, k)] = -w[(3, k)];
                w[(k, 3)] = -w[(k, 3)];
            }
        }
        Self { w }
    }
}

pub fn extract_pair<T: Scalar>(w: &Matrix<T>, pair: BipartitePair) -> PairCovariance<T> {
    PairCovariance {
        w: w.select(&pair.indices()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementResult<T> {
    pub theta_minus: T,
    pub log_neg: T,
    pub chi: T,
}

/// Logarithmic negativity `max(0, −ln 2ϑ⁻)` of a two-mode state.
///
/// `ϑ⁻² = (χ − sqrt(χ² − 4 det W))/2` is evaluated in the cancellation-free
/// form `2 det W / (χ + sqrt(χ² − 4 det W))`.
pub fn log_negativity<T: Scalar>(pc: &PairCovariance<T>) -> Result<EntanglementResult<T>> {
    let chi = pc.chi();
    let det = pc.w.det();
    let two = T::lit(2.0);
    let disc = chi * chi - T::lit(4.0) * det;
    let scale = (chi * chi).max(T::one());
    if disc < -T::lit(1e-10) * scale || !disc.is_finite() {
        return Err(Error::InvalidState {
            discriminant: disc.as_f64(),
        });
    }
    let root = disc.max(T::zero()).sqrt();
    let theta_sq = if chi > T::zero() {
        two * det / (chi + root)
    } else {
        (chi - root) / two
    };
    if !(theta_sq > T::zero()) {
        return Err(Error::InvalidState {
            discriminant: disc.as_f64(),
        });
    }
    let theta_minus = theta_sq.sqrt();
    let log_neg = (-(two * theta_minus).ln()).max(T::zero());
    Ok(EntanglementResult {
        theta_minus,
        log_neg,
        chi,
    })
}

/// Symplectic form for `n` modes in `(q₁, p₁, q₂, p₂, …)` ordering.
pub fn symplectic_form<T: Scalar>(modes: usize) -> Matrix<T> {
    let mut o = Matrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        o[(2 * k, 2 * k + 1)] = T::one();
        o[(2 * k + 1, 2 * k)] = -T::one();
    }
    o
}

/// Symplectic eigenvalues (moduli of the spectrum of `iΩW`), ascending.
pub fn symplectic_eigenvalues<T: Scalar>(w: &Matrix<T>) -> Result<Vec<T>> {
    if !w.is_square() || !w.nrows().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "covariance matrix must be square of even order, got {}x{}",
            w.nrows(),
            w.ncols()
        )));
    }
    let modes = w.nrows() / 2;
    let ow = &symplectic_form::<T>(modes) * w;
    let mut nu: Vec<T> = ow.eigenvalues()?.iter().map(|z| z.im.abs()).collect();
    nu.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    // each value appears twice (±iν)
    Ok(nu.chunks(2).map(|c| (c[0] + c[1]) / T::lit(2.0)).collect())
}

/// Input-state covariance used by the fidelity formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherentInput {
    /// `W_in = I`.
    #[default]
    Identity,
    /// `W_in = ½I`, the vacuum covariance in the ½ normalization.
    HalfIdentity,
}

impl CoherentInput {
    pub fn matrix<T: Scalar>(self) -> Block2<T> {
        let d = match self {
            Self::Identity => T::one(),
            Self::HalfIdentity => T::lit(0.5),
        };
        [[d, T::zero()], [T::zero(), d]]
    }
}

/// `F = 2/sqrt(det(2W_in + Z))` with `Z = SW₁S + SW_c + W_cᵀS + W₂`,
/// `S = diag(1, −1)`.
pub fn teleportation_fidelity<T: Scalar>(pc: &PairCovariance<T>, w_in: &Block2<T>) -> Result<T> {
    let (w1, w2, wc) = (pc.w1(), pc.w2(), pc.wc());
    let s = [T::one(), -T::one()];
    let mut m = [[T::zero(); 2]; 2];
    let mut z = [[0.0f64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let zij = s[i] * w1[i][j] * s[j] + s[i] * wc[i][j] + wc[j][i] * s[j] + w2[i][j];
            z[i][j] = zij.as_f64();
            m[i][j] = T::lit(2.0) * w_in[i][j] + zij;
        }
    }
    let det = det2(&m);
    if !(det > T::zero()) {
        return Err(Error::FidelityConvention {
            det: det.as_f64(),
            z,
        });
    }
    Ok(T::lit(2.0) / det.sqrt())
}

/// Optimal fidelity `1/(1 + e^{−E_N})` for a channel with negativity `E_N`.
pub fn fidelity_bound<T: Scalar>(log_neg: T) -> T {
    (T::one() + (-log_neg).exp()).recip()
}
