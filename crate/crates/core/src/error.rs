use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("DPO amplification {amplification} must satisfy 0 <= eps < kappa_dpo/2 = {half_decay}")]
    DpoOutOfRange { amplification: f64, half_decay: f64 },

    #[error("squeezed bath beyond the quantum bound: M = {m} > sqrt(N(N+1)) = {bound} (N = {n})")]
    UnphysicalBath { n: f64, m: f64, bound: f64 },

    #[error("degenerate steady-state configuration: |alpha1*alpha2 + xi^2| = {denominator:e}")]
    DegenerateConfiguration { denominator: f64 },

    #[error("self-consistent steady state did not converge (best residual {best_residual:e})")]
    NoConvergence { best_residual: f64 },

    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,

    #[error("drift matrix is not Hurwitz (spectral abscissa {abscissa:e}); no stationary state")]
    NotHurwitz { abscissa: f64 },

    #[error("singular linear system")]
    Singular,

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("numerically invalid Gaussian state: chi^2 - 4 det = {discriminant:e}")]
    InvalidState { discriminant: f64 },

    #[error("teleportation fidelity undefined: det(2 W_in + Z) = {det:e} with Z = {z:?}")]
    FidelityConvention { det: f64, z: [[f64; 2]; 2] },

    #[error("reduced collective model requires identical cavities ({0})")]
    AsymmetricCavities(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown preset `{name}`; available: {}", available.join(", "))]
    UnknownPreset {
        name: String,
        available: Vec<&'static str>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl Error {
    /// Process exit status: 1 for input problems, 2 for numerical failures,
    /// 3 for an unknown preset.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidParameter { .. }
            | Error::DpoOutOfRange { .. }
            | Error::UnphysicalBath { .. }
            | Error::AsymmetricCavities(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_) => 1,
            Error::UnknownPreset { .. } => 3,
            _ => 2,
        }
    }
}
