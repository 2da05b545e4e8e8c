//! Error types shared across the engine.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("base dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u8, u8),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("degree weight undefined: term of jet degree 0 present")]
    DegenerateWeight,
    #[error("expected a form of bidegree ({expected}), found ({found})")]
    Bidegree { expected: String, found: String },
    #[error("form is not d_H-closed")]
    NotClosed,
    #[error("input has a nonzero base component that admits no antiderivative")]
    BaseNotExact,
    #[error("density is not variationally trivial; nonzero Euler-Lagrange component on `{0}`")]
    NotTrivial(String),
    #[error("form is not in the kernel of the projector")]
    NotRhoKernel,
    #[error("Lagrangian density must be even and parity-homogeneous")]
    OddLagrangian,
    #[error("derivation coefficients are not parity-homogeneous")]
    MixedParity,
    #[error("stage {0} operators must be verified before stage {1}")]
    UnverifiedStage(usize, usize),
    #[error("unsupported operator shape: {0}")]
    UnsupportedShape(String),
    #[error("jet order {0} exceeds the configured bound {1}")]
    JetOrderBound(usize, usize),
    #[error("generator name `{0}` already declared")]
    DuplicateName(String),
    #[error("{0}")]
    Invalid(String),
}
