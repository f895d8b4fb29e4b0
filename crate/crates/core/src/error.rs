use std::fmt;

/// Errors produced by the geometry, fitting and simulation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid ellipse parameters: {0}")]
    InvalidEllipse(String),

    #[error("conic matrix is zero")]
    ZeroMatrix,

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("conic is not a real ellipse: {0}")]
    NotAnEllipse(&'static str),

    #[error("transform is singular or too ill-conditioned (condition number {condition:.3e})")]
    NearSingularTransform { condition: f64 },

    #[error("point maps onto the line at infinity")]
    PointAtInfinity,

    #[error("matrix has a complex eigenvalue pair (imaginary part {imag:.3e})")]
    ComplexEigenvalues { imag: f64 },

    #[error("inner conic is singular")]
    SingularInnerConic,

    #[error("conics are not projectively concentric: {reason} (concentricity {concentricity:.3e})")]
    NotConcentric {
        reason: NotConcentricReason,
        concentricity: f64,
    },

    #[error("recovered center lies on the line at infinity")]
    CenterAtInfinity,

    #[error("too few boundary points: got {got}, need at least {min}")]
    TooFewPoints { got: usize, min: usize },

    #[error("degenerate ellipse fit: {0}")]
    DegenerateFit(&'static str),

    #[error("iris plane is seen edge-on ({angle_deg:.2} deg between normal and view ray)")]
    DegenerateView { angle_deg: f64 },

    #[error("projected ellipse leaves the image")]
    OutOfFrame,

    #[error("invalid scene: {0}")]
    InvalidScene(String),
}

/// Why a conic pair was rejected by the concentric-circle solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotConcentricReason {
    /// The double eigenvalue is split by more than the tolerance.
    SplitDoubleEigenvalue,
    /// The pencil has a complex eigenvalue pair.
    ComplexPair,
    /// λ₃² / (λ₁λ₂) is not positive, so no real ratio exists.
    NonPositiveRatio,
    /// The two conics coincide up to scale.
    Identical,
}

impl fmt::Display for NotConcentricReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::SplitDoubleEigenvalue => "double eigenvalue is split",
            Self::ComplexPair => "complex eigenvalue pair",
            Self::NonPositiveRatio => "eigenvalue ratio is not positive",
            Self::Identical => "conics are identical",
        };
        f.write_str(s)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
