//! Stationary Gaussian entanglement of two optomechanical cavities coupled
//! by photon hopping and driven by squeezed light.
//!
//! The pipeline runs parameters → semiclassical steady state → linearized
//! drift and diffusion → Lyapunov covariance → two-mode measures. The dense
//! kernels ([`linalg`], [`lyapunov`], [`gaussian`], the Routh–Hurwitz
//! formulas and the squeezing spectra) are generic over [`Scalar`]; the
//! physical layers work in `f64`.

// index loops mirror the matrix formulas; negated comparisons reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod lyapunov;
pub mod params;
pub mod presets;
pub mod scalar;
pub mod squeezing;
pub mod stability;
pub mod steady;
pub mod sweep;

pub use config::SweepConfig;
pub use error::{Error, Result};
pub use gaussian::{BipartitePair, CoherentInput, EntanglementResult, PairCovariance};
pub use linalg::Matrix;
pub use params::{DetuningMode, DetuningSign, PhysicalParams, Thermal};
pub use scalar::Scalar;
pub use squeezing::{BathClass, DpoParams, SqueezedBath};
pub use steady::SteadyState;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Bath64 = SqueezedBath<f64>;
pub type Bath32 = SqueezedBath<f32>;
pub type Lyapunov64 = lyapunov::LyapunovSolution<f64>;
pub type Lyapunov32 = lyapunov::LyapunovSolution<f32>;
pub type Pair64 = PairCovariance<f64>;
pub type Pair32 = PairCovariance<f32>;
